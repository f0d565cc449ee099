#pragma once

#include "ftn/chain.hpp"
#include "ftn/detect.hpp"
#include "ftn/harness.hpp"
#include "ftn/pulse.hpp"
#include "ftn/region.hpp"
#include "ftn/rng.hpp"
