#pragma once

#include "boostlab/adaboost.hpp"
#include "boostlab/adversarial.hpp"
#include "boostlab/core.hpp"
#include "boostlab/csv.hpp"
#include "boostlab/experiment.hpp"
#include "boostlab/meta.hpp"
#include "boostlab/model_io.hpp"
#include "boostlab/parallel.hpp"
#include "boostlab/rng.hpp"
#include "boostlab/stump.hpp"
#include "boostlab/synthetic.hpp"
