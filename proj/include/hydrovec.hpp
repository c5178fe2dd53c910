#pragma once

#include "hydrovec/error.hpp"
#include "hydrovec/geometry.hpp"
#include "hydrovec/raster.hpp"
#include "hydrovec/components.hpp"
#include "hydrovec/geotiff.hpp"
#include "hydrovec/geojson.hpp"
#include "hydrovec/features.hpp"
#include "hydrovec/connector.hpp"
#include "hydrovec/thinner.hpp"
#include "hydrovec/network.hpp"
#include "hydrovec/fcodes.hpp"
#include "hydrovec/metrics.hpp"
#include "hydrovec/config.hpp"
#include "hydrovec/pipeline.hpp"
#include "hydrovec/synthetic.hpp"
