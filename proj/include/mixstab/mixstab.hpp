#pragma once

#include "mixstab/bogoliubov.hpp"
#include "mixstab/droplet.hpp"
#include "mixstab/eigen4.hpp"
#include "mixstab/finite_diff.hpp"
#include "mixstab/fluctuations.hpp"
#include "mixstab/io.hpp"
#include "mixstab/minimize.hpp"
#include "mixstab/parallel.hpp"
#include "mixstab/params.hpp"
#include "mixstab/quadrature.hpp"
#include "mixstab/stability.hpp"
#include "mixstab/validate.hpp"
#include "mixstab/version.hpp"
