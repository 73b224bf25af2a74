#pragma once

// Umbrella header.

#include "lprobe/config.hpp"
#include "lprobe/errors.hpp"
#include "lprobe/io.hpp"
#include "lprobe/jet.hpp"
#include "lprobe/landscape.hpp"
#include "lprobe/linalg.hpp"
#include "lprobe/loss.hpp"
#include "lprobe/network.hpp"
#include "lprobe/parallel.hpp"
#include "lprobe/problem.hpp"
#include "lprobe/quadrature.hpp"
#include "lprobe/rng.hpp"
#include "lprobe/svg.hpp"
#include "lprobe/tape.hpp"
#include "lprobe/train.hpp"
