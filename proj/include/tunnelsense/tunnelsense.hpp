#pragma once

// Umbrella header: the whole toolkit.

#include "tunnelsense/config.hpp"
#include "tunnelsense/csv.hpp"
#include "tunnelsense/diode.hpp"
#include "tunnelsense/dsp.hpp"
#include "tunnelsense/errors.hpp"
#include "tunnelsense/fft.hpp"
#include "tunnelsense/harvest.hpp"
#include "tunnelsense/iq.hpp"
#include "tunnelsense/log.hpp"
#include "tunnelsense/oscillator.hpp"
#include "tunnelsense/pipeline.hpp"
#include "tunnelsense/rng.hpp"
#include "tunnelsense/scene.hpp"
#include "tunnelsense/trace.hpp"
