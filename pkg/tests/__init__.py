# Tests for the spin-direction toolkit
