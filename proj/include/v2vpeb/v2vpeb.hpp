#pragma once

#include "v2vpeb/errors.hpp"
#include "v2vpeb/geometry.hpp"
#include "v2vpeb/waveform.hpp"
#include "v2vpeb/scene.hpp"
#include "v2vpeb/channel.hpp"
#include "v2vpeb/fim_closed.hpp"
#include "v2vpeb/fim_general.hpp"
#include "v2vpeb/scenarios.hpp"
#include "v2vpeb/csv.hpp"
#include "v2vpeb/selfcheck.hpp"
