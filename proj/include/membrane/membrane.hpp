#pragma once

#include "membrane/types.hpp"
#include "membrane/parallel.hpp"
#include "membrane/geometry.hpp"
#include "membrane/constitutive.hpp"
#include "membrane/mesh.hpp"
#include "membrane/discretization.hpp"
#include "membrane/minimizer.hpp"
#include "membrane/verification.hpp"
#include "membrane/diagnostics.hpp"
#include "membrane/config.hpp"
#include "membrane/cli.hpp"
