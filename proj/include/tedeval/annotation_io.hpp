#pragma once

// Readers for ICDAR 2013 / 2015 ground-truth and detection files.
//
//   icdar13 GT:   x1,y1,x2,y2,"text"      (axis-aligned; spaces also accepted)
//   icdar15 GT:   x1,y1,x2,y2,x3,y3,x4,y4,text
//   detections:   the same coordinates, optionally followed by a confidence
//
// A transcription of exactly "###" marks a don't-care region.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tedeval/detail/zip_reader.hpp"
#include "tedeval/error.hpp"
#include "tedeval/geometry.hpp"

namespace tedeval {

enum class Format { icdar13, icdar15 };

inline constexpr std::string_view kDontCare = "###";

inline std::string_view to_string(Format f) {
  return f == Format::icdar13 ? "icdar13" : "icdar15";
}

inline std::optional<Format> parse_format(std::string_view name) {
  if (name == "icdar13") return Format::icdar13;
  if (name == "icdar15") return Format::icdar15;
  return std::nullopt;
}

struct GtInstance {
  Quad quad;
  std::string transcription;
  std::size_t length = 0;  // characters, counted as Unicode scalar values
  bool dont_care = false;

  friend bool operator==(const GtInstance&, const GtInstance&) = default;
};

struct DetInstance {
  Quad quad;
  std::optional<double> confidence;

  friend bool operator==(const DetInstance&, const DetInstance&) = default;
};

struct Sample {
  std::string id;
  std::vector<GtInstance> gts;
  std::vector<DetInstance> dets;
};

struct Dataset {
  std::vector<Sample> samples;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string_view strip_bom(std::string_view s) {
  if (s.starts_with("\xEF\xBB\xBF")) s.remove_prefix(3);
  return s;
}

inline double parse_number(std::string_view field) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || end != field.data() + field.size() ||
      !std::isfinite(value)) {
    throw ParseError("non-numeric coordinate '" + std::string(field) + "'");
  }
  return value;
}

// Splits off the first `count` comma-separated fields; the remainder (which
// may itself contain commas) is returned in `rest`.
inline std::vector<std::string_view> split_fields(std::string_view line, std::size_t count,
                                                  std::string_view& rest, bool& has_rest) {
  std::vector<std::string_view> out;
  has_rest = false;
  while (out.size() < count) {
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) {
      out.push_back(line);
      rest = {};
      return out;
    }
    out.push_back(line.substr(0, comma));
    line.remove_prefix(comma + 1);
  }
  rest = line;
  has_rest = true;
  return out;
}

inline std::vector<std::string_view> split_all(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto at = line.find(sep);
    out.push_back(line.substr(0, at));
    if (at == std::string_view::npos) return out;
    line.remove_prefix(at + 1);
  }
}

inline std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::string_view clean_line(std::string_view line) {
  line = strip_bom(line);
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

inline Quad rectangle(double x1, double y1, double x2, double y2) {
  const double left = std::min(x1, x2);
  const double right = std::max(x1, x2);
  const double top = std::min(y1, y2);
  const double bottom = std::max(y1, y2);
  return Quad{{Point{left, top}, Point{right, top}, Point{right, bottom}, Point{left, bottom}}};
}

inline std::string format_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// Shortest grid value used to compare orientations without flapping on
// floating-point noise.
inline long long snap(double v) { return std::llround(v * 1e9); }

}  // namespace detail

// Counts Unicode scalar values in UTF-8 text. Throws ParseError on malformed
// sequences.
inline std::size_t utf8_length(std::string_view text) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < text.size();) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t width = 0;
    if (lead < 0x80) width = 1;
    else if ((lead >> 5) == 0x6) width = 2;
    else if ((lead >> 4) == 0xE) width = 3;
    else if ((lead >> 3) == 0x1E) width = 4;
    else throw ParseError("invalid UTF-8 in transcription");
    if (i + width > text.size()) throw ParseError("truncated UTF-8 in transcription");
    for (std::size_t k = 1; k < width; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) >> 6) != 0x2) {
        throw ParseError("invalid UTF-8 in transcription");
      }
    }
    i += width;
    ++count;
  }
  return count;
}

// Reorders vertices clockwise (image coordinates) starting at the top-left of
// the text, taking the longer quad axis as the baseline and the reading
// direction as left-to-right (top-to-bottom for vertical boxes). Idempotent;
// preserves the vertex multiset.
inline Quad normalize_vertex_order(const Quad& input) {
  for (const Point& p : input.v) {
    if (!detail::is_finite(p)) throw ParseError("non-finite vertex");
  }
  const double signed_a = signed_area(input);
  if (signed_a == 0.0) throw ParseError("degenerate quad: vertices are collinear");
  if (!is_simple(input)) throw ParseError("quad is self-intersecting");

  Quad q = input;
  if (signed_a < 0.0) q = Quad{{input.v[0], input.v[3], input.v[2], input.v[1]}};

  const auto edge_len = [&](std::size_t from) {
    const Point d = q.v[(from + 1) % 4] - q.v[from];
    return std::hypot(d.x, d.y);
  };
  const double pair_even = edge_len(0) + edge_len(2);
  const double pair_odd = edge_len(1) + edge_len(3);

  std::optional<std::size_t> best;
  std::array<long long, 4> best_key{};
  for (std::size_t r = 0; r < 4; ++r) {
    const double top_pair = r % 2 == 0 ? pair_even : pair_odd;
    const double side_pair = r % 2 == 0 ? pair_odd : pair_even;
    if (top_pair < side_pair * (1.0 - 1e-9)) continue;
    const Point start = q.v[r];
    const Point dir = q.v[(r + 1) % 4] - start;
    const double len = std::hypot(dir.x, dir.y);
    const std::array<long long, 4> key{detail::snap(dir.x / len), detail::snap(dir.y / len),
                                       -detail::snap(start.x + start.y), -detail::snap(start.y)};
    if (!best || key > best_key) {
      best = r;
      best_key = key;
    }
  }
  Quad out;
  for (std::size_t k = 0; k < 4; ++k) out.v[k] = q.v[(*best + k) % 4];
  return out;
}

inline GtInstance parse_gt_line(std::string_view raw, Format format) {
  const std::string_view line = detail::clean_line(raw);
  if (detail::trim(line).empty()) throw ParseError("empty line");

  GtInstance gt;
  std::string_view text;
  if (format == Format::icdar13) {
    std::vector<std::string_view> coords;
    const auto first_comma = line.find(',');
    const auto first_quote = line.find('"');
    if (first_comma != std::string_view::npos && first_comma < first_quote) {
      bool has_rest = false;
      coords = detail::split_fields(line, 4, text, has_rest);
      if (!has_rest) throw ParseError("expected 4 coordinates and a transcription");
    } else {
      // Whitespace-separated variant used by the original ICDAR 2013 files.
      const auto body = first_quote == std::string_view::npos ? line : line.substr(0, first_quote);
      coords = detail::split_whitespace(body);
      if (first_quote != std::string_view::npos) {
        text = line.substr(first_quote);
      } else if (coords.size() > 4) {
        text = line.substr(coords[4].data() - line.data());
        coords.resize(4);
      }
      if (coords.size() != 4 || detail::trim(text).empty()) {
        throw ParseError("expected 4 coordinates and a transcription");
      }
    }
    const double x1 = detail::parse_number(coords[0]);
    const double y1 = detail::parse_number(coords[1]);
    const double x2 = detail::parse_number(coords[2]);
    const double y2 = detail::parse_number(coords[3]);
    if (x1 == x2 || y1 == y2) throw ParseError("degenerate quad: zero-area rectangle");
    gt.quad = detail::rectangle(x1, y1, x2, y2);
    text = detail::trim(text);
    if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
      text = text.substr(1, text.size() - 2);
    }
  } else {
    bool has_rest = false;
    const auto coords = detail::split_fields(line, 8, text, has_rest);
    if (!has_rest) throw ParseError("expected 8 coordinates and a transcription");
    Quad q;
    for (std::size_t k = 0; k < 4; ++k) {
      q.v[k] = {detail::parse_number(coords[2 * k]), detail::parse_number(coords[2 * k + 1])};
    }
    gt.quad = normalize_vertex_order(q);
  }

  text = detail::trim(text);
  gt.transcription = std::string(text);
  gt.dont_care = text == kDontCare;
  gt.length = utf8_length(text);
  if (gt.length == 0) throw ParseError("empty transcription");
  return gt;
}

inline DetInstance parse_det_line(std::string_view raw, Format format = Format::icdar15) {
  const std::string_view line = detail::trim(detail::clean_line(raw));
  if (line.empty()) throw ParseError("empty line");

  std::vector<std::string_view> fields = line.find(',') == std::string_view::npos
                                             ? detail::split_whitespace(line)
                                             : detail::split_all(line, ',');
  const std::size_t coords = format == Format::icdar13 ? 4 : 8;
  if (fields.size() != coords && fields.size() != coords + 1) {
    throw ParseError("expected " + std::to_string(coords) + " coordinates (optionally followed "
                     "by a confidence), got " + std::to_string(fields.size()) + " fields");
  }

  DetInstance det;
  if (format == Format::icdar13) {
    const double x1 = detail::parse_number(fields[0]);
    const double y1 = detail::parse_number(fields[1]);
    const double x2 = detail::parse_number(fields[2]);
    const double y2 = detail::parse_number(fields[3]);
    if (x1 == x2 || y1 == y2) throw ParseError("degenerate quad: zero-area rectangle");
    det.quad = detail::rectangle(x1, y1, x2, y2);
  } else {
    Quad q;
    for (std::size_t k = 0; k < 4; ++k) {
      q.v[k] = {detail::parse_number(fields[2 * k]), detail::parse_number(fields[2 * k + 1])};
    }
    det.quad = normalize_vertex_order(q);
  }
  if (fields.size() == coords + 1) {
    const double c = detail::parse_number(fields.back());
    if (c < 0.0 || c > 1.0) throw ParseError("confidence outside [0, 1]");
    det.confidence = c;
  }
  return det;
}

inline std::string serialize_gt(const GtInstance& gt, Format format) {
  std::string out;
  if (format == Format::icdar13) {
    out = detail::format_number(gt.quad.v[0].x) + "," + detail::format_number(gt.quad.v[0].y) +
          "," + detail::format_number(gt.quad.v[2].x) + "," +
          detail::format_number(gt.quad.v[2].y) + ",\"" + gt.transcription + "\"";
  } else {
    for (const Point& p : gt.quad.v) {
      out += detail::format_number(p.x) + "," + detail::format_number(p.y) + ",";
    }
    out += gt.transcription;
  }
  return out;
}

inline std::string serialize_det(const DetInstance& det, Format format = Format::icdar15) {
  std::string out;
  if (format == Format::icdar13) {
    out = detail::format_number(det.quad.v[0].x) + "," + detail::format_number(det.quad.v[0].y) +
          "," + detail::format_number(det.quad.v[2].x) + "," +
          detail::format_number(det.quad.v[2].y);
  } else {
    for (std::size_t k = 0; k < 4; ++k) {
      if (k) out += ",";
      out += detail::format_number(det.quad.v[k].x) + "," + detail::format_number(det.quad.v[k].y);
    }
  }
  if (det.confidence) out += "," + detail::format_number(*det.confidence);
  return out;
}

namespace detail {

template <typename Instance, typename ParseLine>
std::vector<Instance> parse_lines(std::string_view text, const std::string& source,
                                  ParseLine parse_line) {
  std::vector<Instance> out;
  std::size_t line_no = 0;
  text = strip_bom(text);
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse_line(line));
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), line_no, source);
    } catch (const GeometryError& e) {
      throw ParseError(e.what(), line_no, source);
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<GtInstance> parse_gt_text(std::string_view text, Format format,
                                             const std::string& source = {}) {
  return detail::parse_lines<GtInstance>(
      text, source, [format](std::string_view l) { return parse_gt_line(l, format); });
}

inline std::vector<DetInstance> parse_det_text(std::string_view text, Format format,
                                               const std::string& source = {}) {
  return detail::parse_lines<DetInstance>(
      text, source, [format](std::string_view l) { return parse_det_line(l, format); });
}

// "gt_img_12.txt" and "res_img_12.txt" both map to "img_12".
inline std::string sample_id_from_filename(std::string_view name) {
  if (const auto slash = name.find_last_of("/\\"); slash != std::string_view::npos) {
    name.remove_prefix(slash + 1);
  }
  if (const auto dot = name.rfind('.'); dot != std::string_view::npos && dot > 0) {
    name = name.substr(0, dot);
  }
  for (std::string_view prefix : {"gt_", "res_"}) {
    if (name.starts_with(prefix) && name.size() > prefix.size()) {
      name.remove_prefix(prefix.size());
      break;
    }
  }
  return std::string(name);
}

// Orders "img_2" before "img_10".
inline bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db) {
      std::size_t ei = i, ej = j;
      while (ei < a.size() && std::isdigit(static_cast<unsigned char>(a[ei]))) ++ei;
      while (ej < b.size() && std::isdigit(static_cast<unsigned char>(b[ej]))) ++ej;
      auto na = a.substr(i, ei - i);
      auto nb = b.substr(j, ej - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ei;
      j = ej;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

namespace detail {

struct SourceFile {
  std::string name;  // label used in diagnostics
  std::string text;
};

// Reads every *.txt file of a directory or zip archive, keyed by sample id.
inline std::map<std::string, SourceFile> read_source(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::map<std::string, SourceFile> files;
  const auto add = [&](std::string entry_name, std::string label, std::string text) {
    std::string id = sample_id_from_filename(entry_name);
    if (files.contains(id)) {
      throw IoError(path.string() + ": duplicate sample id '" + id + "'");
    }
    files.emplace(std::move(id), SourceFile{std::move(label), std::move(text)});
  };
  const auto is_txt = [](std::string_view name) {
    return name.size() > 4 && name.substr(name.size() - 4) == ".txt";
  };

  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    for (const auto& entry : fs::directory_iterator(path, ec)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (!is_txt(name)) continue;
      std::ifstream in(entry.path(), std::ios::binary);
      if (!in) throw IoError("cannot read " + entry.path().string());
      add(name, entry.path().string(),
          std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
    }
    if (ec) throw IoError("cannot list directory " + path.string() + ": " + ec.message());
  } else if (fs::is_regular_file(path, ec)) {
    for (auto& entry : read_zip(path)) {
      if (!is_txt(entry.name)) continue;
      add(entry.name, path.string() + ":" + entry.name, std::move(entry.data));
    }
  } else {
    throw IoError("no such directory or archive: " + path.string());
  }
  return files;
}

}  // namespace detail

// Pairs ground-truth and detection files by sample id. Every GT file yields a
// Sample; a missing detection file means no detections. Detection files with
// no GT counterpart are skipped with a warning.
inline Dataset load_dataset(const std::filesystem::path& gt_source,
                            const std::filesystem::path& det_source, Format format) {
  const auto gt_files = detail::read_source(gt_source);
  const auto det_files = detail::read_source(det_source);

  Dataset ds;
  for (const auto& [id, file] : gt_files) {
    Sample s;
    s.id = id;
    s.gts = parse_gt_text(file.text, format, file.name);
    if (const auto it = det_files.find(id); it != det_files.end()) {
      s.dets = parse_det_text(it->second.text, format, it->second.name);
    }
    ds.samples.push_back(std::move(s));
  }
  for (const auto& [id, file] : det_files) {
    if (!gt_files.contains(id)) {
      ds.warnings.push_back("detections for '" + id + "' (" + file.name +
                            ") have no ground truth; skipped");
    }
  }
  std::sort(ds.samples.begin(), ds.samples.end(),
            [](const Sample& a, const Sample& b) { return natural_less(a.id, b.id); });
  return ds;
}

}  // namespace tedeval
