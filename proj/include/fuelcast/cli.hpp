#pragma once

namespace fuelcast::cli {

/// Entry point behind the binary's main(). Exit codes: 0 success,
/// 1 data/runtime error, 2 usage or input-schema error.
int run(int argc, const char* const* argv);

}  // namespace fuelcast::cli
