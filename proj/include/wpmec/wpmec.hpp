#pragma once

// Umbrella header: weighted sum computation rate maximization for a
// wireless-powered MEC network with DS-CDMA uplink offloading.

#include "wpmec/channel.hpp"
#include "wpmec/config.hpp"
#include "wpmec/experiments.hpp"
#include "wpmec/fp_power.hpp"
#include "wpmec/mode_search.hpp"
#include "wpmec/model.hpp"
#include "wpmec/parallel.hpp"
#include "wpmec/rates.hpp"
#include "wpmec/rng.hpp"
#include "wpmec/time_alloc.hpp"
