#pragma once

// Umbrella header.

#include "surprisal/compat_engine.hpp"
#include "surprisal/errors.hpp"
#include "surprisal/evidence_combiner.hpp"
#include "surprisal/report_io.hpp"
#include "surprisal/special_functions.hpp"
#include "surprisal/study_model.hpp"
#include "surprisal/version.hpp"
