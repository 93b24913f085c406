#pragma once

#include "tedeval/annotation_io.hpp"
#include "tedeval/baseline.hpp"
#include "tedeval/error.hpp"
#include "tedeval/evaluation.hpp"
#include "tedeval/geometry.hpp"
#include "tedeval/matching.hpp"
#include "tedeval/overlay.hpp"
#include "tedeval/report.hpp"
#include "tedeval/scoring.hpp"
#include "tedeval/version.hpp"
