/// Umbrella header.
#ifndef BLENERGY_BLENERGY_HPP
#define BLENERGY_BLENERGY_HPP

#include "aggregate.hpp"
#include "ble112.hpp"
#include "discovery.hpp"
#include "events.hpp"
#include "profile.hpp"
#include "sensitivity.hpp"
#include "simulation.hpp"

#endif  // BLENERGY_BLENERGY_HPP
