import torch

# Single-threaded deterministic kernels: trained weights, and therefore every
# downstream gain number, reproduce exactly across runs on the same build.
# Also faster here: these tensors are too small to amortize thread fan-out.
torch.set_num_threads(1)
torch.use_deterministic_algorithms(True)
