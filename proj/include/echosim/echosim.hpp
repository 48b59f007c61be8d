#pragma once

#include "echosim/audio/spatial.hpp"
#include "echosim/audio/synth.hpp"
#include "echosim/audio/track_bank.hpp"
#include "echosim/audio/wav.hpp"
#include "echosim/audio_buffer.hpp"
#include "echosim/dsp/encode.hpp"
#include "echosim/dsp/feature_dump.hpp"
#include "echosim/dsp/features.hpp"
#include "echosim/dsp/fft.hpp"
#include "echosim/dsp/mel.hpp"
#include "echosim/harness/audit.hpp"
#include "echosim/harness/batch.hpp"
#include "echosim/world/config.hpp"
#include "echosim/world/env.hpp"
#include "echosim/world/policy.hpp"
#include "echosim/world/rollout.hpp"
