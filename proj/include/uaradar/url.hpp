#pragma once

#include <string>
#include <string_view>

namespace uaradar {

// Lowercases scheme and host and strips the fragment. The query is kept.
std::string canonicalize_url(std::string_view url);

// canonicalize_url() with the query removed as well.
std::string canonical_url_without_query(std::string_view url);

}  // namespace uaradar
