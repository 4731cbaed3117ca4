#pragma once

#include "forest_share/cart.hpp"
#include "forest_share/dataset.hpp"
#include "forest_share/evaluation.hpp"
#include "forest_share/fixtures.hpp"
#include "forest_share/forest.hpp"
#include "forest_share/kmeans1d.hpp"
#include "forest_share/model_io.hpp"
#include "forest_share/path_analysis.hpp"
#include "forest_share/random.hpp"
#include "forest_share/sharing.hpp"
#include "forest_share/stabbing.hpp"
