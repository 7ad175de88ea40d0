#pragma once

#include "fiscalforge/checkpoint.hpp"
#include "fiscalforge/data_ingest.hpp"
#include "fiscalforge/environment.hpp"
#include "fiscalforge/errors.hpp"
#include "fiscalforge/evaluation.hpp"
#include "fiscalforge/neural.hpp"
#include "fiscalforge/optimizer.hpp"
#include "fiscalforge/quantum_ga.hpp"
#include "fiscalforge/special_functions.hpp"
#include "fiscalforge/td3.hpp"
