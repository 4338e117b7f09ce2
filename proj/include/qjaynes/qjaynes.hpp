// Umbrella header: max-entropy qubit state reconstruction and
// typical-subspace compression simulation.
#pragma once

#include "qjaynes/errors.hpp"
#include "qjaynes/jaynes.hpp"
#include "qjaynes/oracle.hpp"
#include "qjaynes/protocol.hpp"
#include "qjaynes/qubit.hpp"
#include "qjaynes/rng.hpp"
#include "qjaynes/typical.hpp"
