#pragma once

#include "jive/block_model.hpp"
#include "jive/decomposition.hpp"
#include "jive/error.hpp"
#include "jive/joint_segmentation.hpp"
#include "jive/linalg.hpp"
#include "jive/perturbation_bounds.hpp"
#include "jive/pipeline.hpp"
#include "jive/random.hpp"
#include "jive/signal_extraction.hpp"
#include "jive/synthetic.hpp"
