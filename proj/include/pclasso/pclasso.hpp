#pragma once
// Umbrella header for the pcLasso library.
#include <pclasso/contour.hpp>
#include <pclasso/core.hpp>
#include <pclasso/crossval.hpp>
#include <pclasso/data.hpp>
#include <pclasso/dof.hpp>
#include <pclasso/dof_mc.hpp>
#include <pclasso/experiment.hpp>
#include <pclasso/layout.hpp>
#include <pclasso/penalty.hpp>
#include <pclasso/rng.hpp>
#include <pclasso/simgen.hpp>
#include <pclasso/solver/kkt.hpp>
#include <pclasso/solver/path.hpp>
#include <pclasso/theory.hpp>
