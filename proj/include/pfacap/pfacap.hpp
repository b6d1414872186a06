#pragma once

// Convenience header pulling in the whole library.

#include "block.hpp"
#include "bracket.hpp"
#include "converse.hpp"
#include "fsmc.hpp"
#include "fsmc_io.hpp"
#include "gadgets.hpp"
#include "info.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "pfa.hpp"
#include "pfa_io.hpp"
#include "rational.hpp"
#include "search.hpp"
#include "sigma.hpp"
#include "stability.hpp"
#include "witness.hpp"
