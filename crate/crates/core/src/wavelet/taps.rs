//! Orthonormal lowpass taps, 20 significant digits.
#![allow(clippy::excessive_precision, clippy::unreadable_literal, clippy::approx_constant)]

pub(super) const COIF1: [f64; 6] = [
    -0.015655728135791992526,
    -0.072732619512526448024,
    0.38486484686485774725,
    0.85257202021160042045,
    0.33789766245748176967,
    -0.072732619512526448024,
];

pub(super) const COIF2: [f64; 12] = [
    -0.00072054944552034699507,
    -0.0018232088709110320946,
    0.0056114348193688342456,
    0.023680171946847768806,
    -0.059434418646431087307,
    -0.076488599078280754278,
    0.41700518442323904805,
    0.81272363544941349534,
    0.38611006682276285042,
    -0.067372554723725593805,
    -0.04146493678687177401,
    0.016387336463203640427,
];

pub(super) const COIF3: [f64; 18] = [
    -0.000034599773197272773883,
    -0.000070983302506379005611,
    0.00046621695982040286947,
    0.0011175187708306302235,
    -0.0025745176881367970103,
    -0.0090079761367306238987,
    0.015880544863669450942,
    0.034555027573297733013,
    -0.082301927106299818487,
    -0.071799821619154834013,
    0.42848347637736998101,
    0.79377722262608717479,
    0.40517690240911819927,
    -0.061123390002972541277,
    -0.065771911281469367184,
    0.023452696142077166243,
    0.0077825964256727457566,
    -0.0037935128643808016755,
];

pub(super) const COIF4: [f64; 24] = [
    -0.0000017849909144933466813,
    -0.0000032596479400307506783,
    0.000031229861599195265305,
    0.000062338854312787181126,
    -0.0002599743371222568032,
    -0.00058902022463321647799,
    0.001266561078925660206,
    0.0037514346971460863492,
    -0.0056582838001308837069,
    -0.015211728187697211597,
    0.025082253337949606818,
    0.039334422605589146331,
    -0.09622042453595263696,
    -0.066627472366817156604,
    0.43438603311435654244,
    0.78223893442428258983,
    0.41530842700068227313,
    -0.05607731960356925566,
    -0.081266710249193723345,
    0.026682304669604832607,
    0.016068947131575026513,
    -0.0073461679362680497689,
    -0.0016294924252267858123,
    0.00089231390253700296443,
];

pub(super) const COIF5: [f64; 30] = [
    -0.00000009604010112767892125,
    -0.00000016237995172048335175,
    0.0000020612203985788781567,
    0.0000037007277113394795164,
    -0.000021270221672515613819,
    -0.000041219861924265502197,
    0.00014035632812373242699,
    0.00030185794166824474986,
    -0.00063755892612588110917,
    -0.0016616273039298787746,
    0.0024315754425382884906,
    0.0067615202206204168024,
    -0.0091595073386761629949,
    -0.019758391600965465139,
    0.032674799467057350954,
    0.041287530472117831469,
    -0.10556315130733722647,
    -0.062037751574981950893,
    0.43798230665916331793,
    0.7742936228603274516,
    0.42157126673075435177,
    -0.052046670253554756651,
    -0.091921588060086083296,
    0.028169744270532351894,
    0.023408322118927783078,
    -0.010131584846900274915,
    -0.0041593126275786396555,
    0.0021782943778456947604,
    0.00035857774116175769127,
    -0.00021208186206749399965,
];

pub(super) const DB1: [f64; 2] = [0.7071067811865475244, 0.7071067811865475244];

pub(super) const DB2: [f64; 4] = [
    0.48296291314453414337,
    0.83651630373780790558,
    0.22414386804201338103,
    -0.12940952255126038117,
];

pub(super) const DB3: [f64; 6] = [
    0.332670552950082616,
    0.80689150931109257649,
    0.4598775021184915701,
    -0.1350110200102545887,
    -0.085441273882026661693,
    0.035226291885709536603,
];

pub(super) const DB4: [f64; 8] = [
    0.23037781330889650086,
    0.71484657055291564709,
    0.63088076792985890788,
    -0.027983769416859854211,
    -0.18703481171909308408,
    0.030841381835560763627,
    0.032883011666885199735,
    -0.010597401785069032105,
];

pub(super) const DB5: [f64; 10] = [
    0.16010239797419291448,
    0.60382926979718967054,
    0.72430852843777292773,
    0.13842814590132073151,
    -0.24229488706638203186,
    -0.032244869584638374648,
    0.077571493840045713523,
    -0.0062414902127982742742,
    -0.012580751999081999469,
    0.003335725285473771278,
];

pub(super) const DB6: [f64; 12] = [
    0.11154074335010946362,
    0.49462389039845308568,
    0.75113390802109535068,
    0.31525035170919762909,
    -0.22626469396543982008,
    -0.12976686756726193556,
    0.097501605587323049102,
    0.027522865530305728626,
    -0.031582039317486029565,
    0.00055384220116149613925,
    0.0047772575109455106396,
    -0.0010773010853084795649,
];

pub(super) const DB7: [f64; 14] = [
    0.07785205408500917902,
    0.39653931948191730654,
    0.72913209084623511992,
    0.46978228740519312247,
    -0.14390600392856497541,
    -0.22403618499387498264,
    0.071309219266830264751,
    0.080612609151083071913,
    -0.03802993693501441358,
    -0.016574541630666880654,
    0.012550998556099840613,
    0.00042957797292136652113,
    -0.0018016407040474909153,
    0.00035371379997452024845,
];

pub(super) const DB8: [f64; 16] = [
    0.054415842243104009955,
    0.31287159091429997066,
    0.67563073629728980681,
    0.58535468365420671277,
    -0.015829105256349305667,
    -0.28401554296154692652,
    0.00047248457391328277036,
    0.12874742662047845886,
    -0.01736930100180754617,
    -0.044088253930794751507,
    0.013981027917398281649,
    0.0087460940474057767164,
    -0.0048703529934515743104,
    -0.0003917403733769470463,
    0.00067544940645056936637,
    -0.00011747678412476953373,
];

pub(super) const DB9: [f64; 18] = [
    0.038077947363878346589,
    0.24383467461259035373,
    0.6048231236901111119,
    0.65728807805130053808,
    0.13319738582500757619,
    -0.29327378327917490881,
    -0.096840783222976460514,
    0.14854074933810638014,
    0.030725681479333379212,
    -0.067632829061329973676,
    0.00025094711483145195759,
    0.022361662123679097205,
    -0.0047232047577513972779,
    -0.0042815036824634298345,
    0.0018476468830562264766,
    0.00023038576352319596721,
    -0.00025196318894271013697,
    0.000039347320316271599481,
];

pub(super) const DB10: [f64; 20] = [
    0.026670057900555553587,
    0.18817680007769148902,
    0.52720118893172558648,
    0.68845903945360356574,
    0.28117234366057746075,
    -0.24984642432731537942,
    -0.1959462743773770435,
    0.12736934033579326008,
    0.09305736460357235116,
    -0.071394147166397087145,
    -0.029457536821875812858,
    0.03321267405934100174,
    0.0036065535669561696554,
    -0.010733175483330575044,
    0.0013953517470529011658,
    0.0019924052951850561172,
    -0.00068585669495971162656,
    -0.00011646685512928545095,
    0.000093588670320069591334,
    -0.000013264202894521244812,
];
