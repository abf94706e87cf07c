# network 패키지: numpy 기반 LSTM/RNN/GRU, BPTT, Adam
from .adam import AdamState, adam_step, adam_update, clip_gradients
from .cells import (
    LstmState,
    gru_cell_backward,
    gru_cell_forward,
    lstm_cell_backward,
    lstm_cell_forward,
    rnn_cell_backward,
    rnn_cell_forward,
    sigmoid,
)
from .model import ForwardCache, backward, loss_and_grad, loss_rmse, predict, sequence_forward
from .params import (
    CellType,
    GradientSet,
    NetworkParams,
    init_params,
    input_side_names,
    tensor_names,
    zero_params,
)
from .serialization import load_params, params_from_bytes, params_to_bytes, save_params
from .trainer import TrainConfig, train
