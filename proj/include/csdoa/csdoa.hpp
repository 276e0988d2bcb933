// SPDX-License-Identifier: Apache-2.0
//
// csdoa - CS beamformer root-MUSIC library
//
// Umbrella header.

#pragma once

#include "csdoa/array_model.hpp"
#include "csdoa/compression.hpp"
#include "csdoa/deviation.hpp"
#include "csdoa/harness.hpp"
#include "csdoa/io.hpp"
#include "csdoa/rng.hpp"
#include "csdoa/rootmusic.hpp"
#include "csdoa/spectral.hpp"
