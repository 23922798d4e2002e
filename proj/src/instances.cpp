#include "cls/instances.hpp"

namespace cls {

EolInstance desk_eol() { return eol_from_edges(3, {{1, 4}, {2, 8}, {4, 6}, {6, 2}, {7, 3}}); }

IterInstance desk_iter() { return iter_from_map(3, {{1, 4}, {4, 5}, {5, 7}, {3, 6}, {7, 8}}); }

EolInstance coverage_eol() { return eol_from_edges(3, {{1, 6}, {6, 4}, {4, 2}, {2, 8}, {8, 5}, {3, 7}}); }

IterInstance coverage_iter() { return iter_from_map(3, {{1, 5}, {3, 6}, {4, 6}, {6, 8}}); }

}  // namespace cls
