//! φ₀..φ₄ at selected points, evaluated in 60-digit arithmetic from
//! φ_k(z) = (e^z − Σ_{j<k} z^j/j!)/z^k (power series near 0) and rounded.

#[rustfmt::skip]
pub const PHI_TABLE: &[([f64; 2], [[f64; 2]; 5])] = &[
    ([0.0, 0.0], [[1.0, 0.0], [1.0, 0.0], [0.5, 0.0], [0.16666666666666666, 0.0], [0.041666666666666664, 0.0]]),
    ([1e-08, 0.0], [[1.00000001, 0.0], [1.000000005, 0.0], [0.5000000016666667, 0.0], [0.16666666708333333, 0.0], [0.04166666675, 0.0]]),
    ([-0.0001, 0.0], [[0.9999000049998333, 0.0], [0.999950001666625, 0.0], [0.49998333374999165, 0.0], [0.16666250008333194, 0.0], [0.04166583334722202, 0.0]]),
    ([0.001, 0.0], [[1.0010005001667084, 0.0], [1.0005001667083417, 0.0], [0.5001667083416681, 0.0], [0.16670834166805576, 0.0], [0.04167500138908733, 0.0]]),
    ([-0.5, 0.0], [[0.6065306597126334, 0.0], [0.7869386805747332, 0.0], [0.4261226388505337, 0.0], [0.1477547222989326, 0.0], [0.03782388873546811, 0.0]]),
    ([0.9, 0.3], [[2.349748600855098, 0.7268624197139756], [1.59203607409309, 0.2769462194289429], [0.6843514805694041, 0.07960086139791293], [0.2108851010353751, 0.018150367874778233], [0.05026855699363451, 0.003410889751875424]]),
    ([-1.0, 0.0], [[0.36787944117144233, 0.0], [0.6321205588285577, 0.0], [0.36787944117144233, 0.0], [0.13212055882855767, 0.0], [0.03454610783810899, 0.0]]),
    ([-2.5, 0.0], [[0.0820849986238988, 0.0], [0.36716600055044046, 0.0], [0.2531335997798238, 0.0], [0.09874656008807048, 0.0], [0.027168042631438474, 0.0]]),
    ([3.0, 4.0], [[-13.128783081462158, -15.200784463067954], [-4.127579483866332, 0.4365111574657907], [-0.5454677528694333, 0.872794056314508], [0.01419091866598928, 0.2720101272168503], [0.02522453059461476, 0.05703733494613042]]),
    ([-10.0, 0.0], [[4.5399929762484854e-05, 0.0], [0.09999546000702375, 0.0], [0.09000045399929762, 0.0], [0.040999954600070235, 0.0], [0.012566671206659642, 0.0]]),
    ([-30.0, 5.0], [[2.6544037820820875e-14, -8.973251817966189e-14], [0.03243243243243109, 0.005405405405408173], [0.03140978816654498, 0.005054784514243891], [0.015224843543324184, 0.002368981106745901], [0.004924431999171896, 0.0007417726296371194]]),
    ([-100.0, 0.0], [[3.720075976020836e-44, 0.0], [0.01, 0.0], [0.0099, 0.0], [0.004901, 0.0], [0.0016176566666666666, 0.0]]),
    ([-1000.0, 0.0], [[0.0, 0.0], [0.001, 0.0], [0.000999, 0.0], [0.000499001, 0.0], [0.00016616766566666667, 0.0]]),
    ([-10000.0, 100.0], [[0.0, -0.0], [9.999000099990002e-05, 9.99900009999e-07], [9.998000399940008e-05, 9.997000499930009e-07], [4.998500449885022e-05, 4.99750074983503e-07], [1.6660002665700288e-05, 1.665500516495045e-07]]),
    ([-1000000.0, 0.0], [[0.0, 0.0], [1e-06, 0.0], [9.99999e-07, 0.0], [4.99999000001e-07, 0.0], [1.6666616666766666e-07, 0.0]]),
    ([0.0, 0.5], [[0.8775825618903728, 0.479425538604203], [0.958851077208406, 0.24483487621925457], [0.48966975243850913, 0.08229784558318799], [0.16459569116637598, 0.02066049512298173], [0.04132099024596346, 0.0041419510005813375]]),
    ([0.0, 10.0], [[-0.8390715290764524, -0.5440211108893698], [-0.05440211108893698, 0.18390715290764525], [0.018390715290764525, 0.10544021110889369], [0.01054402111088937, 0.04816092847092355], [0.004816092847092355, 0.01561226455557773]]),
    ([-1000000.0, 1000.0], [[0.0, 0.0], [9.99999000001e-07, 9.99999000001e-10], [9.99998000004e-07, 9.99997000005e-10], [4.999985000045e-07, 4.999975000075e-10], [1.6666600000266666e-07, 1.6666550000516664e-10]]),
    ([20.0, 0.0], [[485165195.4097903, 0.0], [24258259.720489513, 0.0], [1212912.9360244756, 0.0], [60645.62180122379, 0.0], [3032.2727567278557, 0.0]]),
    ([50.0, 0.0], [[5.184705528587072e+21, 0.0], [1.0369411057174145e+20, 0.0], [2.073882211434829e+18, 0.0], [4.147764422869658e+16, 0.0], [829552884573931.6, 0.0]]),
    ([-0.02, 0.01], [[0.9801496637815047, 0.009801823367438832], [0.990049916088588, 0.004933789672352374], [0.49667914990352885, 0.0016500913341457334], [0.1658358305417606, 0.0004133485635936287], [0.0415004162681156, 8.277995437636574e-05]]),
    ([-7.3, 0.0], [[0.0006755387751938444, 0.0], [0.13689376181161728, 0.0], [0.11823373125868257, 0.0], [0.052296749142646225, 0.0], [0.015667111989591843, 0.0]]),
];
