// Umbrella header for the cvep library.

#pragma once

#include "cvep/code.hpp"
#include "cvep/dsp.hpp"
#include "cvep/errors.hpp"
#include "cvep/harness.hpp"
#include "cvep/io.hpp"
#include "cvep/lagdec.hpp"
#include "cvep/lexicon.hpp"
#include "cvep/rng.hpp"
#include "cvep/synth.hpp"
