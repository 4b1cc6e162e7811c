#pragma once

// Umbrella header.

#include "ybcert/admittance.hpp"
#include "ybcert/certify.hpp"
#include "ybcert/graph.hpp"
#include "ybcert/matpower.hpp"
#include "ybcert/network.hpp"
#include "ybcert/oracle.hpp"
#include "ybcert/report.hpp"
