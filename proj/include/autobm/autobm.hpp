#pragma once

// Convenience umbrella: the whole library.

#include "core.hpp"
#include "rng.hpp"
#include "oracle.hpp"
#include "dynamics.hpp"
#include "learning.hpp"
#include "experiments.hpp"
#include "io.hpp"
