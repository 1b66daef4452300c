#ifndef SPAMSIM_SPAMSIM_HPP
#define SPAMSIM_SPAMSIM_HPP

#include "spamsim/clock.hpp"
#include "spamsim/config.hpp"
#include "spamsim/corpus.hpp"
#include "spamsim/dns.hpp"
#include "spamsim/filters.hpp"
#include "spamsim/message.hpp"
#include "spamsim/netsim.hpp"
#include "spamsim/pipeline.hpp"
#include "spamsim/scenario.hpp"
#include "spamsim/time.hpp"

#endif  // SPAMSIM_SPAMSIM_HPP
