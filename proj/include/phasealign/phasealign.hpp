#ifndef PHASEALIGN_PHASEALIGN_HPP
#define PHASEALIGN_PHASEALIGN_HPP

#include "phasealign/common.hpp"
#include "phasealign/ddsa.hpp"
#include "phasealign/harness.hpp"
#include "phasealign/io.hpp"
#include "phasealign/network.hpp"
#include "phasealign/onebit.hpp"
#include "phasealign/rng.hpp"

#endif
