#pragma once

namespace secount {

__extension__ typedef unsigned __int128 uint128;

}  // namespace secount
