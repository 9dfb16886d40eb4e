#pragma once

#include "tilekit/error.hpp"
#include "tilekit/rational.hpp"
#include "tilekit/radical.hpp"
#include "tilekit/random.hpp"
#include "tilekit/graph.hpp"
#include "tilekit/cliques.hpp"
#include "tilekit/lp.hpp"
#include "tilekit/fraclp.hpp"
#include "tilekit/tiler.hpp"
#include "tilekit/regularity.hpp"
#include "tilekit/slicing.hpp"
#include "tilekit/pipeline.hpp"
#include "tilekit/io.hpp"
#include "tilekit/experiment.hpp"
