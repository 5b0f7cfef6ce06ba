#pragma once

#include "lmqn/compact.hpp"
#include "lmqn/errors.hpp"
#include "lmqn/experiment.hpp"
#include "lmqn/family.hpp"
#include "lmqn/matrix.hpp"
#include "lmqn/matrix_io.hpp"
#include "lmqn/oracle.hpp"
#include "lmqn/pair_store.hpp"
#include "lmqn/qr_engine.hpp"
#include "lmqn/small_eig.hpp"
#include "lmqn/spectrum.hpp"
#include "lmqn/sym_indef.hpp"
