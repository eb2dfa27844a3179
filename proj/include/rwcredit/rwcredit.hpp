#pragma once

#include "rwcredit/cirpp.hpp"
#include "rwcredit/market_curve.hpp"
#include "rwcredit/mc_engine.hpp"
#include "rwcredit/measure_change.hpp"
#include "rwcredit/scenario.hpp"
#include "rwcredit/sde_core.hpp"
#include "rwcredit/term_structure.hpp"
