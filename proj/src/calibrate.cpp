#include "ci/field.hpp"
