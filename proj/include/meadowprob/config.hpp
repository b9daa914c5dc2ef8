#pragma once

namespace meadowprob::config {

// Minterm enumeration is exponential in the generator count; every operation
// that expands minterms refuses to go past this cap (default 16).
int max_generators();
void set_max_generators(int cap);

} // namespace meadowprob::config
