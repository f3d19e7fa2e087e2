#pragma once

#include "glyphforge/annotate.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/format6.hpp"
#include "glyphforge/gmm.hpp"
#include "glyphforge/gradcheck.hpp"
#include "glyphforge/ifr.hpp"
#include "glyphforge/image.hpp"
#include "glyphforge/losses.hpp"
#include "glyphforge/matrix.hpp"
#include "glyphforge/metrics.hpp"
#include "glyphforge/rasterizer.hpp"
#include "glyphforge/reprlearn.hpp"
#include "glyphforge/rng.hpp"
#include "glyphforge/textio.hpp"
