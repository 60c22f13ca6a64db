#pragma once

#include "choiceless/bignat.hpp"
#include "choiceless/encodings.hpp"
#include "choiceless/hereditary.hpp"
#include "choiceless/mostowski.hpp"
#include "choiceless/ordinals.hpp"
#include "choiceless/report.hpp"
#include "choiceless/specker.hpp"
#include "choiceless/starcount.hpp"
