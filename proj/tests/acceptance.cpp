#include "testutil.hpp"

#include "h2sc/runner.hpp"

TEST_CASE("acceptance stub compiles") { CHECK(true); }
