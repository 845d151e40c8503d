#pragma once

#include "sphlab/checksum.hpp"
#include "sphlab/density.hpp"
#include "sphlab/kernel.hpp"
#include "sphlab/octree.hpp"
#include "sphlab/particle_model.hpp"
#include "sphlab/report.hpp"
#include "sphlab/scheduler.hpp"
#include "sphlab/selection.hpp"
#include "sphlab/snapshot.hpp"
#include "sphlab/workload.hpp"
#include "sphlab/workload_io.hpp"
