#pragma once

#include "hyperdyn/coding.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/experiments.hpp"
#include "hyperdyn/geodesics.hpp"
#include "hyperdyn/io.hpp"
#include "hyperdyn/measures.hpp"
#include "hyperdyn/moebius.hpp"
#include "hyperdyn/parallel.hpp"
#include "hyperdyn/schottky.hpp"
#include "hyperdyn/transfer.hpp"
