#pragma once

#include "tbdde/branch.hpp"
#include "tbdde/detect.hpp"
#include "tbdde/errors.hpp"
#include "tbdde/euler.hpp"
#include "tbdde/io.hpp"
#include "tbdde/model.hpp"
#include "tbdde/nf_engine.hpp"
#include "tbdde/tb_continuous.hpp"
#include "tbdde/tb_discrete.hpp"
