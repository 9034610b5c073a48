#pragma once

// Umbrella header for the radiomap library.

#include "radiomap/cr.hpp"
#include "radiomap/errors.hpp"
#include "radiomap/fuse.hpp"
#include "radiomap/glcm.hpp"
#include "radiomap/image.hpp"
#include "radiomap/metrics.hpp"
#include "radiomap/nifti.hpp"
#include "radiomap/parallel.hpp"
#include "radiomap/pgm.hpp"
#include "radiomap/phantom.hpp"
#include "radiomap/preprocess.hpp"
#include "radiomap/raster.hpp"
#include "radiomap/stability.hpp"
#include "radiomap/stats.hpp"
