#pragma once

#include "pitchflap/ctcr.hpp"
#include "pitchflap/dde_sim.hpp"
#include "pitchflap/optimizer.hpp"
#include "pitchflap/polynomial.hpp"
#include "pitchflap/quasipoly.hpp"
#include "pitchflap/rootfinder.hpp"
#include "pitchflap/rotor_model.hpp"
