#ifndef MVM_MVM_HPP
#define MVM_MVM_HPP

// Umbrella header.
#include "mvm/bessel.hpp"
#include "mvm/errors.hpp"
#include "mvm/io.hpp"
#include "mvm/matrix.hpp"
#include "mvm/model.hpp"
#include "mvm/modes.hpp"
#include "mvm/oracle.hpp"
#include "mvm/params.hpp"
#include "mvm/presets.hpp"
#include "mvm/rng.hpp"
#include "mvm/sampler.hpp"
#include "mvm/spectral.hpp"
#include "mvm/torus.hpp"
#include "mvm/version.hpp"

#endif  // MVM_MVM_HPP
