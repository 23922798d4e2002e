#pragma once

#include "cls/tfnp.hpp"

namespace cls {

// The n = m = 3 example pair used throughout the tests.
// EOL edges 1->4, 2->8, 4->6, 6->2, 7->3 (solutions 3, 7, 8).
EolInstance desk_eol();
// Iter map 1->4, 4->5, 5->7, 3->6, 7->8, others fixed (solutions 3, 7).
IterInstance desk_iter();

// A second n = m = 3 pair whose grid shows the gadgets the desk pair lacks
// (a second source, a downward orange pass-through, labyrinth restarts).
// EOL edges 1->6, 6->4, 4->2, 2->8, 8->5, 3->7; Iter 1->5, 3->6, 4->6, 6->8.
EolInstance coverage_eol();
IterInstance coverage_iter();

}  // namespace cls
