#pragma once

#include "treeclust/anytime.hpp"
#include "treeclust/batch_hac.hpp"
#include "treeclust/dataset.hpp"
#include "treeclust/errors.hpp"
#include "treeclust/experiment.hpp"
#include "treeclust/hierarchy.hpp"
#include "treeclust/incremental.hpp"
#include "treeclust/io.hpp"
#include "treeclust/linkage.hpp"
#include "treeclust/random.hpp"
#include "treeclust/validation.hpp"
