#pragma once

#include "parni/core.hpp"
#include "parni/model_core.hpp"
#include "parni/numerics.hpp"
#include "parni/polya_gamma.hpp"
#include "parni/marginal_likelihood.hpp"
#include "parni/parni_sampler.hpp"
#include "parni/ads_sampler.hpp"
#include "parni/hyper_updates.hpp"
#include "parni/chain.hpp"
#include "parni/sim_data.hpp"
#include "parni/harness.hpp"
