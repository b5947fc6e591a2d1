#pragma once

#include "depthlab/agent.hpp"
#include "depthlab/bootstrap.hpp"
#include "depthlab/cell_set.hpp"
#include "depthlab/depth_chain.hpp"
#include "depthlab/elo.hpp"
#include "depthlab/errors.hpp"
#include "depthlab/experiment.hpp"
#include "depthlab/fixtures.hpp"
#include "depthlab/game.hpp"
#include "depthlab/game_types.hpp"
#include "depthlab/match.hpp"
#include "depthlab/nogo.hpp"
#include "depthlab/parallel.hpp"
#include "depthlab/pie_rules.hpp"
#include "depthlab/player_spec.hpp"
#include "depthlab/pr_search.hpp"
#include "depthlab/rng.hpp"
#include "depthlab/symmetry.hpp"
#include "depthlab/verify.hpp"
#include "depthlab/winrate_table.hpp"
#include "depthlab/y.hpp"
