#include "sparseq/envs/copy_chain.hpp"

// Header-only; this translation unit just anchors the class for the library.
