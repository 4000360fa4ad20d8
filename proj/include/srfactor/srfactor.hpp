#pragma once

#include "srfactor/bigint.hpp"
#include "srfactor/lattice.hpp"
#include "srfactor/numtheory.hpp"
#include "srfactor/pipeline.hpp"
#include "srfactor/qaoa.hpp"
#include "srfactor/relations.hpp"
#include "srfactor/training.hpp"
