// hecke.hpp
// Umbrella header.
#pragma once

#include "hecke/arith.hpp"
#include "hecke/bounds.hpp"
#include "hecke/coeffs.hpp"
#include "hecke/gl2.hpp"
#include "hecke/int128.hpp"
#include "hecke/modmath.hpp"
#include "hecke/primes.hpp"
#include "hecke/series.hpp"
#include "hecke/stats.hpp"
#include "hecke/wide_uint.hpp"
