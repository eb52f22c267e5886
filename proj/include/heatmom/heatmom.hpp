#pragma once

#include "heatmom/analytic_oracle.hpp"
#include "heatmom/compare.hpp"
#include "heatmom/conic_problem.hpp"
#include "heatmom/galerkin_oracle.hpp"
#include "heatmom/heat_models.hpp"
#include "heatmom/moment_index.hpp"
#include "heatmom/moment_table.hpp"
#include "heatmom/relaxation.hpp"
#include "heatmom/run_config.hpp"
#include "heatmom/sdp_solver.hpp"
#include "heatmom/sdpa_io.hpp"
