// Generated by tests/oracle/cole_cole_mp.py (mpmath, 40 digits). Do not edit.
// (tissue, f_Hz, eps_re, eps_im, sigma_re, sigma_im)
pub const COLE_COLE_ORACLE: &[(&str, f64, f64, f64, f64, f64)] = &[
    ("Bone", 10000.0, 5.215542479166923166451948e+2, -3.662474150022881620505532e+4, 2.037526033049675585063232e-2, 2.901536814317900199777066e-4),
    ("Bone", 15199.11082952933, 4.124523794907702319138462e+2, -2.415479004120589961987073e+4, 2.04244347841434518983297e-2, 3.487551211210386964917551e-4),
    ("Bone", 23101.29700083158, 3.405558991667254842576188e+2, -1.59321832822626502353736e+4, 2.047577062043470547644041e-2, 4.37676641752984686358025e-4),
    ("Bone", 35111.917342151275, 2.925678848049236465221177e+2, -1.051113704620003256974594e+4, 2.05320750115725641405574e-2, 5.714915265959226057059616e-4),
    ("Bone", 53366.99231206313, 2.598392847829936921599079e+2, -6.937841436886619267711203e+3, 2.059803043045885091911996e-2, 7.71447076684787419526976e-4),
    ("Bone", 81113.08307896872, 2.367696522839500881114947e+2, -4.583305188077933168929095e+3, 2.068227383217679185460356e-2, 1.068428695611153540504714e-3),
    ("Bone", 123284.67394420659, 2.196272145303323615106199e+2, -3.032882268950253856634175e+3, 2.080143237453468293538588e-2, 1.506342892842130451641346e-3),
    ("Bone", 187381.7422860383, 2.057517157763621000608565e+2, -2.013283256531741582224409e+3, 2.098750210535999665445629e-2, 2.14486190854076171221942e-3),
    ("Bone", 284803.5868435805, 1.930320366004030948747027e+2, -1.344333081818829000096622e+3, 2.130006549415170650762422e-2, 3.058464511261785877436286e-3),
    ("Bone", 432876.12810830615, 1.796017818288790968754351e+2, -9.070174469865573610760293e+2, 2.184277819218225724285366e-2, 4.325166948488762197071135e-3),
    ("Bone", 657933.2246575683, 1.637980997784315239798481e+2, -6.222410353059097116585418e+2, 2.277556003769531751117291e-2, 5.995415351753552347509679e-3),
    ("Bone", 1000000.0, 1.445082027443256702294414e+2, -4.367599545325702719289689e+2, 2.429804938140368292513572e-2, 8.039352989807302568898476e-3),
    ("Bone", 100000.0, 2.276416800089356560660114e+2, -3.727311345115375990636575e+3, 2.073596587407049710123414e-2, 1.266427639420943118004966e-3),
    ("Bone", 10000.0, 5.215542479166923166451948e+2, -3.662474150022881620505532e+4, 2.037526033049675585063232e-2, 2.901536814317900199777066e-4),
    ("Fat", 10000.0, 1.085329488530312317140002e+3, -4.283583009683123501978541e+4, 2.383064436619741420462823e-2, 6.037959577962303988284423e-4),
    ("Fat", 15199.11082952933, 6.372402032052156957916908e+2, -2.832210437672946863779444e+4, 2.39481681606591920581066e-2, 5.38827741826625991038746e-4),
    ("Fat", 23101.29700083158, 3.885727518270694931035113e+2, -1.871830586714184476151562e+4, 2.405644791730654951819192e-2, 4.993870830383917884368303e-4),
    ("Fat", 35111.917342151275, 2.461539862581096510575219e+2, -1.236851477291115326742013e+4, 2.416020949807358918956401e-2, 4.808282955530716223330921e-4),
    ("Fat", 53366.99231206313, 1.619427988218609313281004e+2, -8.171952129766879232948202e+3, 2.426203022603643308747918e-2, 4.807983475078201738285565e-4),
    ("Fat", 81113.08307896872, 1.106949257665409281017466e+2, -5.399067654529823419826742e+3, 2.436342139290585153330046e-2, 4.995134891936315174571197e-4),
    ("Fat", 123284.67394420659, 7.874723232934327713128926e+1, -3.56710475517875860089062e+3, 2.446546939766790733517707e-2, 5.400985210505951541349705e-4),
    ("Fat", 187381.7422860383, 5.844480228454920161212416e+1, -2.356879238351283485076873e+3, 2.456932367390249455723979e-2, 6.092587354585126034180706e-4),
    ("Fat", 284803.5868435805, 4.534444692684507824511646e+1, -1.557451944381633563476398e+3, 2.467679243185762424562452e-2, 7.184526680182144244398417e-4),
    ("Fat", 432876.12810830615, 3.677858641488139611326714e+1, -1.029457991140796407014899e+3, 2.479138922119455639256312e-2, 8.857012706329651775938081e-4),
    ("Fat", 657933.2246575683, 3.109265088152180602794962e+1, -6.808397579861318392034308e+2, 2.492041814059996508491958e-2, 1.138067881580735211779681e-3),
    ("Fat", 1000000.0, 2.722193158006911531344454e+1, -4.507999849813617691980586e+2, 2.507913141427056531869665e-2, 1.514424184098101742876849e-3),
    ("Fat", 100000.0, 9.288599517645032957210187e+1, -4.388495481940516719366062e+3, 2.441429870656922283533826e-2, 5.167480384170403986003677e-4),
    ("Fat", 10000.0, 1.085329488530312317140002e+3, -4.283583009683123501978541e+4, 2.383064436619741420462823e-2, 6.037959577962303988284423e-4),
    ("Muscle", 10000.0, 2.590870793621826288243564e+4, -6.126481453200645915624859e+5, 3.408314964302024085682916e-1, 1.441366266090796475897656e-2),
    ("Muscle", 15199.11082952933, 1.859282216242101664615349e+4, -4.059290030683745643915617e+5, 3.432391851065111334965849e-1, 1.57214317765432589565034e-2),
    ("Muscle", 23101.29700083158, 1.427050508206221042389053e+4, -2.690543451418067502242357e+5, 3.457840622313326411504947e-1, 1.834021009683966447742767e-2),
    ("Muscle", 35111.917342151275, 1.16046959152417406575122e+4, -1.785220709196754970200695e+5, 3.487185577766939646722646e-1, 2.266819336204654915044299e-2),
    ("Muscle", 53366.99231206313, 9.863932537481168064396624e+3, -1.187294797395320320608021e+5, 3.52500624137195192596067e-1, 2.928541743413019600946685e-2),
    ("Muscle", 81113.08307896872, 8.61841103742466890688975e+3, -7.933493553836755083894051e+4, 3.580007863169838873374279e-1, 3.889078509062202670650949e-2),
    ("Muscle", 123284.67394420659, 7.58341967331848587381646e+3, -5.347650414200834409756487e+4, 3.667758211140625449310179e-1, 5.201190732565088333734202e-2),
    ("Muscle", 187381.7422860383, 6.548793766258040689733465e+3, -3.656472660883838336482146e+4, 3.811695518726474528012205e-1, 6.82680007947218113841261e-2),
    ("Muscle", 284803.5868435805, 5.382439712698704721827677e+3, -2.546928877772940876736739e+4, 4.035439775990054361643417e-1, 8.5281185109045752676314e-2),
    ("Muscle", 432876.12810830615, 4.092601164884092133967804e+3, -1.802528379792222758247051e+4, 4.340845671240842715293755e-1, 9.855794921104183456825304e-2),
    ("Muscle", 657933.2246575683, 2.845860230437597380406736e+3, -1.281397169834562314277353e+4, 4.690230395903103201344866e-1, 1.041655192434482988019841e-1),
    ("Muscle", 1000000.0, 1.836413098093685287685952e+3, -9.035843880146541962414497e+3, 5.026866097131675070598397e-1, 1.021642567709567179909837e-1),
    ("Muscle", 100000.0, 8.089148721070481578443296e+3, -6.504264499133590094509026e+4, 3.618485127804301937042807e-1, 4.500195886512570543284811e-2),
    ("Muscle", 10000.0, 2.590870793621826288243564e+4, -6.126481453200645915624859e+5, 3.408314964302024085682916e-1, 1.441366266090796475897656e-2),
    ("Skin", 10000.0, 1.133561669416938952907694e+3, -3.668392400195424489654181e+2, 2.040818503740992680959696e-4, 6.306287271651688189088916e-4),
    ("Skin", 15199.11082952933, 1.13256748655926383737651e+3, -2.467663406439923590116277e+2, 2.086568760401996998909235e-4, 9.576589458409595513389155e-4),
    ("Skin", 23101.29700083158, 1.131155085099659916862035e+3, -1.698951731508809470486153e+2, 2.183463831243619606236403e-4, 1.453741251170795445665851e-3),
    ("Skin", 35111.917342151275, 1.129136996289549776534097e+3, -1.222716721388964145644924e+2, 2.388410628756683016900284e-4, 2.205615377695035822977601e-3),
    ("Skin", 53366.99231206313, 1.126232045207036798173879e+3, -9.501997428528685220921137e+1, 2.821085404782712041858038e-4, 3.34371463371793474468486e-3),
    ("Skin", 81113.08307896872, 1.122011564588265557679647e+3, -8.270378973825821209320479e+1, 3.732028211376319169738062e-4, 5.063103910698831118482526e-3),
    ("Skin", 123284.67394420659, 1.115811511938815232548321e+3, -8.226393528176975867712232e+1, 5.642183028816075277526973e-4, 7.652943850127163805847956e-3),
    ("Skin", 187381.7422860383, 1.106590126433177855976684e+3, -9.231662720317475442698924e+1, 9.623560924676161648319476e-4, 1.153566570075965108299026e-2),
    ("Skin", 284803.5868435805, 1.092705192288494055969702e+3, -1.126387952982792681278391e+2, 1.784686957037206375468791e-3, 1.731318858125162563703866e-2),
    ("Skin", 432876.12810830615, 1.071593586823954398142145e+3, -1.436612881086291577498779e+2, 3.459648611375040078227268e-3, 2.580609789472719747977615e-2),
    ("Skin", 657933.2246575683, 1.039395885967165485178387e+3, -1.857410528106089416636863e+2, 6.798581674500153125098603e-3, 3.80444587556661608966331e-2),
    ("Skin", 1000000.0, 9.907595485675836045217313e+2, -2.379348067956803475751286e+2, 1.323690879870960322347425e-2, 5.511843333246144614031893e-2),
    ("Skin", 100000.0, 1.119213090136462714325136e+3, -8.111853603078350735565734e+1, 4.51282718062506702938667e-4, 6.226462533991587934497207e-3),
    ("Skin", 10000.0, 1.133561669416938952907694e+3, -3.668392400195424489654181e+2, 2.040818503740992680959696e-4, 6.306287271651688189088916e-4),
];
