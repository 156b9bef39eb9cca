#pragma once

#include "bounds.hpp"
#include "chain.hpp"
#include "column.hpp"
#include "defects.hpp"
#include "harness.hpp"
#include "interface.hpp"
#include "lattice.hpp"
#include "planted.hpp"
#include "reflection.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "snapshot.hpp"
#include "toy.hpp"
