#pragma once

#include "polar/bang.hpp"
#include "polar/bounds.hpp"
#include "polar/documents.hpp"
#include "polar/errors.hpp"
#include "polar/instance_io.hpp"
#include "polar/linalg.hpp"
#include "polar/optimizer.hpp"
#include "polar/properties.hpp"
#include "polar/random.hpp"
#include "polar/sign_search.hpp"
