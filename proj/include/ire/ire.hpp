#pragma once

#include "ire/bench.hpp"
#include "ire/bits.hpp"
#include "ire/cipher.hpp"
#include "ire/common.hpp"
#include "ire/entropy.hpp"
#include "ire/envelope.hpp"
#include "ire/keymat.hpp"
#include "ire/keystream.hpp"
#include "ire/randomness.hpp"
#include "ire/selftest.hpp"
#include "ire/window_kernels.hpp"
